import os
import tempfile

path = os.path.join(tempfile.mkdtemp(), "data.txt")
out = open(path, "w")
out.write("alpha\nbeta\n")
out.close()

handle = open(path)
lines = handle.read().splitlines()
handle.close()
print(lines)
