import sys

from torelli_lab.main import main

sys.exit(main())
