import subprocess
import sys


def main():
    # Forward args to pytest; default to the fast suite.
    args = sys.argv[1:] or ["tests/", "-m", "not slow"]
    print("Running pytest...")
    cmd = [sys.executable, "-m", "pytest"] + args
    completed = subprocess.run(cmd, check=False)
    sys.exit(completed.returncode)


if __name__ == "__main__":
    main()
