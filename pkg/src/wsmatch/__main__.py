from wsmatch.cli import main

main()
