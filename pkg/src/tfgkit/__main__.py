import sys

from tfgkit.cli import main

sys.exit(main())
