from mertens_audit.cli import main

main()
