import sys

from fronttrack.cli import main

sys.exit(main())
