"""PyInstaller entry script, avoids relative-import issues."""
from src.flowcorr.cli import main

if __name__ == "__main__":
    main()
