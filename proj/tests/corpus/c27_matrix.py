def transpose(matrix):
    rows = []
    for column in range(len(matrix[0])):
        rows.append([row[column] for row in matrix])
    return rows


def diagonal(matrix):
    cells = []
    for entry in enumerate(matrix):
        index = entry[0]
        row = entry[1]
        cells.append(row[index])
    return cells


m = [[1, 2, 3], [4, 5, 6], [7, 8, 9]]
print(transpose(m))
print(diagonal(m))
