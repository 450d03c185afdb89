import math


def distance(p, q):
    dx = q[0] - p[0]
    dy = q[1] - p[1]
    return math.hypot(dx, dy)


def perimeter(points):
    total = 0.0
    for edge in zip(points, points[1:] + points[:1]):
        start = edge[0]
        end = edge[1]
        total += distance(start, end)
    return round(total, 6)


def centre(points):
    xs = [p[0] for p in points]
    coords = (sum(xs) / len(xs), 0.0)
    return "({}, {})".format(coords[0], coords[1])


square = [(0, 0), (1, 0), (1, 1), (0, 1)]
print(perimeter(square))
print(centre(square))
