def fallback(value, default):
    if value == None:
        return default
    return value


def count_nonempty(rows):
    n = 0
    for row in rows:
        if not row == []:
            n += 1
    return n


print(fallback(None, 7), fallback(3, 7))
print(count_nonempty([[1], [], [2, 3], []]))
