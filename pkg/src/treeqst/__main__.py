import sys

from treeqst.cli import main

sys.exit(main())
