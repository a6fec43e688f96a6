"""Encode the Statlog German credit file (german.data) as 24 numeric covariates plus a 0/1 label.

Usage: python3 encode_german.py german.data > german.csv
"""
import sys

ORDINAL = {
    0: ("checking", {"A11": 1, "A12": 2, "A13": 3, "A14": 4}),
    2: ("history", {"A30": 0, "A31": 1, "A32": 2, "A33": 3, "A34": 4}),
    5: ("savings", {"A61": 1, "A62": 2, "A63": 3, "A64": 4, "A65": 5}),
    6: ("employment", {"A71": 1, "A72": 2, "A73": 3, "A74": 4, "A75": 5}),
    16: ("job", {"A171": 1, "A172": 2, "A173": 3, "A174": 4}),
}
NUMERIC = {1: "duration", 4: "amount", 7: "installment_rate", 10: "residence",
           12: "age", 15: "n_credits", 17: "n_liable"}
INDICATOR = [
    (3, "A40", "purpose_new_car"), (3, "A41", "purpose_used_car"), (3, "A43", "purpose_radio_tv"),
    (8, "A93", "male_single"), (8, "A92", "female"), (9, "A103", "guarantor"),
    (11, "A121", "real_estate"), (11, "A124", "no_property"), (13, "A143", "no_other_plans"),
    (14, "A152", "owns_home"), (18, "A192", "telephone"), (19, "A201", "foreign_worker"),
]

def main(path):
    cols = []
    for i in sorted(set(NUMERIC) | set(ORDINAL)):
        cols.append((i, None))
    header = [NUMERIC[i] if i in NUMERIC else ORDINAL[i][0] for i, _ in cols]
    header += [name for _, _, name in INDICATOR] + ["bad"]
    print(",".join(header))
    for line in open(path):
        f = line.split()
        if not f:
            continue
        row = []
        for i, _ in cols:
            row.append(f[i] if i in NUMERIC else str(ORDINAL[i][1][f[i]]))
        row += ["1" if f[i] == code else "0" for i, code, _ in INDICATOR]
        row.append("1" if f[20] == "2" else "0")
        print(",".join(row))

if __name__ == "__main__":
    main(sys.argv[1])
