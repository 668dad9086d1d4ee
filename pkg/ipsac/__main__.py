import sys

from ipsac.main import main

sys.exit(main())
