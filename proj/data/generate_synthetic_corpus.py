#!/usr/bin/env python3
"""Writes synthetic_bgl_1000.log, a deterministic BGL-layout corpus.

Lines follow the loghub layout
  <alert_tag> <unix_ts> <date> <node> <fulltime> <node> <subsystem> <component> <severity> <content...>
and include a few systematically mislabeled message types (failures tagged "-"
and a benign message carrying an alert tag) plus a handful of malformed lines.
"""
import random
import sys
import time

NORMAL = [
    ("KERNEL", "INFO", "instruction cache parity error corrected"),
    ("KERNEL", "INFO", "generating core.{n}"),
    ("KERNEL", "INFO", "CE sym {n}, at 0x{h}, mask 0x{m}"),
    ("APP", "INFO", "ciod: generated {n} core files for program /bgl/apps/run{n}"),
    ("MMCS", "INFO", "idoproxydb has been started: Name: DB{n} Version: 1"),
    ("KERNEL", "INFO", "total of {n} ddr error(s) detected and corrected"),
    ("APP", "INFO", "job {n} exited normally with status 0"),
    ("DISCOVERY", "WARNING", "Node card VPD check: missing node {n}"),
]
ANOMALOUS = [
    ("KERNDTLB", "KERNEL", "FATAL", "data TLB error interrupt"),
    ("KERNSTOR", "KERNEL", "FATAL", "data storage interrupt"),
    ("APPREAD", "APP", "FATAL", "ciod: failed to read message prefix on control stream (CioStream socket to 172.16.{n}.{m}:{p}"),
    ("KERNMC", "KERNEL", "FATAL", "machine check interrupt (bit=0x{m}): L2 dcache unit data parity error"),
    ("APPSEV", "APP", "FATAL", "ciod: Error reading message prefix after LOAD_MESSAGE on CioStream socket"),
]
# Failures that the original labels missed, and one benign message flagged.
MISLABELED_NORMAL = [
    ("KERNEL", "FATAL", "PANIC: segmentation violation in thread {n}"),
    ("KERNEL", "FATAL", "hit ASSERT condition: ASSERT expression={n}"),
    ("APP", "ERROR", "Connection refused by host node{n}"),
    ("KERNEL", "FATAL", "parity error in read queue {n}"),
    ("APP", "FATAL", "ciod: Error loading /bgl/apps/job{n}: program image too big"),
]
MISLABELED_ANOMALOUS = [("APPOK", "APP", "INFO", "Mounting NFS filesystems on node{n}")]


def fill(text, rng):
    return text.format(n=rng.randint(1, 9999), h=format(rng.getrandbits(32), "08x"),
                       m=format(rng.getrandbits(16), "04x"), p=rng.randint(1024, 65535))


def main(path, n_lines=1000, seed=20050603):
    rng = random.Random(seed)
    ts = 1117838570
    lines = []
    for i in range(n_lines):
        ts += rng.randint(0, 3)
        node = "R%02d-M%d-N%d-C:J%02d-U%02d" % (rng.randint(0, 63), rng.randint(0, 1), rng.randint(0, 15),
                                               rng.randint(2, 17), rng.randint(0, 1))
        u = rng.random()
        if u < 0.70:
            sub, sev, msg = rng.choice(NORMAL)
            tag = "-"
        elif u < 0.85:
            tag, sub, sev, msg = rng.choice(ANOMALOUS)
        elif u < 0.97:
            sub, sev, msg = rng.choice(MISLABELED_NORMAL)
            tag = "-"
        else:
            tag, sub, sev, msg = rng.choice(MISLABELED_ANOMALOUS)
        # A few records arrive slightly out of order.
        line_ts = ts - 5 if rng.random() < 0.02 else ts
        t = time.gmtime(line_ts)
        date = time.strftime("%Y.%m.%d", t)
        full = time.strftime("%Y-%m-%d-%H.%M.%S", t) + ".%06d" % rng.randint(0, 999999)
        comp = "RAS"
        lines.append(f"{tag} {line_ts} {date} {node} {full} {node} {comp} {sub} {sev} {fill(msg, rng)}")
        if i in (137, 512, 888):
            lines.append("- 11178385xx truncated line")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "synthetic_bgl_1000.log")
