import os
import tempfile

base = tempfile.mkdtemp()


def write_lines(name, lines):
    path = os.path.join(base, name)
    fh = open(path, "w")
    for line in lines:
        fh.write(line + "\n")
    fh.close()
    return path


def count_lines(path):
    f = open(path)
    n = len(f.readlines())
    f.close()
    return n


p = write_lines("a.txt", ["x", "y", "z"])
print(count_lines(p))
