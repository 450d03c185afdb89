"""Expands the per-idiom comparison and review totals into per-method
fixtures: table2_methods.csv (count_a, count_b per method) and
table3_verdicts.jsonl (one verdict per method and source)."""

import csv
import json
import pathlib
import sys

TAGS = [
    "list_comprehension", "for_multiple_targets", "chain_comparison", "fstring",
    "assign_multiple_target", "star_in_call", "truth_value_test", "loop_else",
    "with", "dict_comprehension", "chain_assign_same_value", "set_comprehension",
]

# methods, count_a, count_b, equals, a_more, b_more, a_zero
COMPARISON = [
    (100, 205, 131, 63, 36, 1, 0),
    (100, 197, 110, 63, 37, 0, 0),
    (100, 166, 132, 56, 32, 12, 6),
    (100, 285, 225, 76, 23, 1, 0),
    (100, 176, 157, 55, 26, 18, 1),
    (100, 145, 127, 67, 21, 12, 2),
    (100, 287, 161, 43, 54, 3, 1),
    (100, 129, 113, 78, 15, 6, 0),
    (100, 155, 132, 82, 14, 4, 0),
    (101, 157, 120, 68, 31, 2, 0),
    (100, 223, 227, 58, 25, 17, 1),
    (100, 140, 123, 78, 18, 4, 0),
]

# methods, a_ref, b_ref, a_correct, b_correct, a_wrong, b_wrong
REVIEW = [
    (10, 24, 11, 21, 7, 3, 4),
    (9, 25, 11, 24, 5, 1, 6),
    (9, 11, 10, 8, 5, 3, 5),
    (15, 37, 23, 37, 14, 0, 9),
    (10, 20, 16, 19, 14, 1, 2),
    (8, 10, 10, 9, 5, 1, 5),
    (13, 37, 19, 33, 14, 4, 5),
    (8, 11, 8, 11, 7, 0, 1),
    (9, 14, 10, 13, 10, 1, 0),
    (8, 14, 8, 10, 7, 4, 1),
    (13, 23, 26, 19, 26, 4, 0),
    (8, 12, 12, 12, 12, 0, 0),
]


def spread(amount, slots, bump):
    for i in range(amount):
        bump(slots[i % len(slots)])


def methods_for(tag, row):
    _, total_a, total_b, equals, a_more, b_more, a_zero = row
    # Every method falls in exactly one of the three classes.
    rows = [[1, 1] for _ in range(equals)]
    rows += [[2, 1] for _ in range(a_more)]
    rows += [[0 if i < a_zero else 1, 2] for i in range(b_more)]
    eq = list(range(equals))
    am = list(range(equals, equals + a_more))
    bm = list(range(equals + a_more, len(rows)))
    da = total_a - sum(r[0] for r in rows)
    db = total_b - sum(r[1] for r in rows)
    assert da >= 0 and db >= 0, tag
    common = min(da, db)
    both = eq or am

    def inc_both(i):
        rows[i][0] += 1
        rows[i][1] += 1

    def inc_a(i):
        rows[i][0] += 1

    def inc_b(i):
        rows[i][1] += 1

    spread(common, both, inc_both)
    if da > common:
        spread(da - common, am, inc_a)
    if db > common:
        spread(db - common, [i for i in bm if rows[i][0] > 0] or bm, inc_b)
    assert sum(r[0] for r in rows) == total_a and sum(r[1] for r in rows) == total_b, tag
    return rows


def verdicts_for(tag, row):
    methods, a_ref, b_ref, _, _, a_wrong, b_wrong = row
    out = []
    for source, ref, wrong in (("A", a_ref, a_wrong), ("B", b_ref, b_wrong)):
        counted = [0] * methods
        spread(ref, list(range(methods)), lambda i: counted.__setitem__(i, counted[i] + 1))
        wrongs = [0] * methods
        k = 0
        while wrong:
            i = k % methods
            if wrongs[i] < counted[i]:
                wrongs[i] += 1
                wrong -= 1
            k += 1
        for i in range(methods):
            out.append({
                "method_id": f"{tag}-r{i + 1:02d}", "idiom": tag, "source": source,
                "refactorings_counted": counted[i], "correct": counted[i] - wrongs[i],
                "wrong": wrongs[i], "notes": "",
            })
    return out


def main(out_dir):
    out_dir = pathlib.Path(out_dir)
    with open(out_dir / "table2_methods.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["method_id", "idiom", "count_a", "count_b"])
        for tag, row in zip(TAGS, COMPARISON):
            for i, (a, b) in enumerate(methods_for(tag, row)):
                writer.writerow([f"{tag}-{i + 1:03d}", tag, a, b])
    with open(out_dir / "table3_verdicts.jsonl", "w") as fh:
        for tag, row in zip(TAGS, REVIEW):
            for v in verdicts_for(tag, row):
                fh.write(json.dumps(v) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else ".")
