import sys

from jnseq.cli import main

sys.exit(main())
