"""Writes a small benchmark dataset and matching canned completions.

    python3 tools/fixtures/make_bench_fixture.py tests/fixtures/bench
    build/tools/replay_import tests/fixtures/bench/responses.jsonl tests/fixtures/bench/replay
"""
import json
import sys
from pathlib import Path

RECORDS = [
    ("list_comprehension", "demo/metrics", '''def positives(values):
    out = []
    for v in values:
        if v > 0:
            out.append(v * 2)
    return out
''', '''def positives(values):
    out = [v * 2 for v in values if v > 0]
    return out
''', 1, "Here is the refactored code:\n\n```python\ndef positives(values):\n    return [v * 2 for v in values if v > 0]\n```\n\nI made 1 refactoring using PEP 202 - List Comprehensions.\n"),
    ("for_multiple_targets", "demo/geometry", '''def total_area(rects):
    total = 0
    for r in rects:
        w = r[0]
        h = r[1]
        total += w * h
    return total
''', '''def total_area(rects):
    total = 0
    for w, h in rects:
        total += w * h
    return total
''', 1, "```python\ndef total_area(rects):\n    total = 0\n    for w, h in rects:\n        total += w * h\n    return total\n```\nNumber of refactorings: 1\n"),
    ("chain_comparison", "demo/grid", '''def inside(x, y, width, height):
    return 0 <= x and x < width and 0 <= y and y < height
''', '''def inside(x, y, width, height):
    return 0 <= x < width and 0 <= y < height
''', 2, "```python\ndef inside(x, y, width, height):\n    return 0 <= x < width and 0 <= y < height\n```\n\nI have made 2 refactorings.\n"),
    ("fstring", "demo/report", '''def greet(name, n):
    return "Hello %s, you have %d messages" % (name, n)
''', '''def greet(name, n):
    return f"Hello {name}, you have {n:d} messages"
''', 1, "```python\ndef greet(name, n):\n    return f\"Hello {name}, you have {n} messages\"\n```\nRefactorings made: 1\n"),
    ("assign_multiple_target", "demo/config", '''def defaults():
    host = "localhost"
    port = 8080
    return host, port
''', '''def defaults():
    host, port = "localhost", 8080
    return host, port
''', 1, "```python\ndef defaults():\n    host, port = \"localhost\", 8080\n    return host, port\n```\nI made 1 refactoring.\n"),
    ("star_in_call", "demo/geometry", '''def box_volume():
    dims = [2, 3, 4]
    return volume(dims[0], dims[1], dims[2])
''', '''def box_volume():
    dims = [2, 3, 4]
    return volume(*dims)
''', 1, "```python\ndef box_volume():\n    dims = [2, 3, 4]\n    return volume(*dims)\n```\n\nTotal refactorings: 1\n"),
    ("truth_value_test", "demo/queue", '''def drain(items):
    while len(items) != 0:
        items.pop()
    if items == []:
        return True
''', '''def drain(items):
    while items:
        items.pop()
    if not items:
        return True
''', 2, "```python\ndef drain(items):\n    while items:\n        items.pop()\n    if not items:\n        return True\n```\nI made 2 truth value test refactorings.\n"),
    ("loop_else", "demo/search", '''def find(items, target):
    found = False
    for item in items:
        if item == target:
            found = True
            break
    if not found:
        print("missing")
''', '''def find(items, target):
    for item in items:
        if item == target:
            break
    else:
        print("missing")
''', 1, "```python\ndef find(items, target):\n    for item in items:\n        if item == target:\n            break\n    else:\n        print(\"missing\")\n```\nRefactoring count: 1\n"),
    ("with", "demo/files", '''def read_all(path):
    fh = open(path)
    data = fh.read()
    fh.close()
    return data
''', '''def read_all(path):
    with open(path) as fh:
        data = fh.read()
    return data
''', 1, "```python\ndef read_all(path):\n    with open(path) as fh:\n        return fh.read()\n```\n\nI have made 1 refactoring using PEP 343 - The 'with' Statement.\n"),
    ("dict_comprehension", "demo/stats", '''def squares(keys):
    table = {}
    for k in keys:
        table[k] = k * k
    return table
''', '''def squares(keys):
    table = {k: k * k for k in keys}
    return table
''', 1, "```python\ndef squares(keys):\n    return {k: k * k for k in keys}\n```\nNumber of PEP 274 - Dict Comprehensions refactorings made: 1\n"),
    ("chain_assign_same_value", "demo/state", '''def counters():
    hits = 0
    misses = 0
    return hits, misses
''', '''def counters():
    hits = misses = 0
    return hits, misses
''', 1, "```python\ndef counters():\n    hits = misses = 0\n    return hits, misses\n```\nRefactorings: 1\n"),
    ("set_comprehension", "demo/text", '''def initials(words):
    seen = set()
    for w in words:
        seen.add(w[0])
    return seen
''', '''def initials(words):
    seen = {w[0] for w in words}
    return seen
''', 1, "The code can be simplified.\n\n```python\ndef initials(words):\n    return {w[0] for w in words}\n```\n\nIn total, 2 refactorings were made.\n"),
]


def main(out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "dataset.jsonl", "w") as data, open(out / "responses.jsonl", "w") as resp:
        for i, (idiom, repo, code, refactored, count, response) in enumerate(RECORDS, 1):
            data.write(json.dumps({
                "idiom": idiom, "method_id": f"m{i:02d}", "repo": repo, "original_code": code,
                "benchmark_refactored_code": refactored, "benchmark_count": count,
            }) + "\n")
            resp.write(json.dumps({"idiom": idiom, "original_code": code, "response": response}) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/bench")
