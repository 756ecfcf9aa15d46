from bootperc.cli import main

main()
