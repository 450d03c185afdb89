def index_by_name(people):
    table = {}
    for person in people:
        table[person["name"]] = person["age"]
    return table


def inverse(mapping):
    flipped = {}
    for key, value in mapping.items():
        if value is not None:
            flipped[value] = key
    return flipped


people = [{"name": "ann", "age": 31}, {"name": "bob", "age": 27}]
print(sorted(index_by_name(people).items()))
print(sorted(inverse({"a": 1, "b": 2, "c": None}).items()))
