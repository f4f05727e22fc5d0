import sys

from mmdiff.cli import main

sys.exit(main())
