from localmix.cli import main

raise SystemExit(main())
