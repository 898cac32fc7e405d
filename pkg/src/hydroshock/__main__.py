import sys

from .harness_io.cli import main

sys.exit(main())
