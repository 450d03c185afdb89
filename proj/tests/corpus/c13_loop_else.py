def find_index(items, target):
    found = False
    for i, item in enumerate(items):
        if item == target:
            found = True
            break
    if not found:
        print("missing", target)
    return items.count(target)


find_index([1, 2, 3], 2)
find_index([1, 2, 3], 9)
