import sys

from rbtensor.cli import main

sys.exit(main())
