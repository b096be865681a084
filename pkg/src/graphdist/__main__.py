import sys

from graphdist.cli import main

sys.exit(main())
