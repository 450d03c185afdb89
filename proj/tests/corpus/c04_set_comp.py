def initials(names):
    letters = set()
    for name in names:
        letters.add(name[0].upper())
    return letters


def residues(numbers, modulus):
    seen = set()
    for n in numbers:
        if n > 0:
            seen.add(n % modulus)
    return seen


print(sorted(initials(["ada", "bob", "alan", "carl"])))
print(sorted(residues([1, 5, 9, -3, 12, 7], 4)))
