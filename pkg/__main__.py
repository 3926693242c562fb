"""`python -m constcoef` runs the detector CLI."""
from cli import main as run_constcoef

if __name__ == "__main__":
    run_constcoef()
