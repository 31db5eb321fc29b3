from netident.cli import main

raise SystemExit(main())
