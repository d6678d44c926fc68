import sys

sys.setrecursionlimit(100_000)
