#!/usr/bin/env python3
"""Recompute the golden outputs from the raw fixture files and compare.

This is a second implementation that shares no code with the crate:
schedule expansion, trip evaluation, daily means, set-argmin counts,
average fastest time and the delay analysis are redone here with exact
fractions and zoneinfo. Usage:

    python3 verify.py OUT_DIR [--dep-proc MIN --arr-proc MIN] [--delay SEGMENT]

OUT_DIR holds the CSVs written by `d2d fastest-time`, `fastest` and
`reliability` (and `delay` when --delay is given). Exits 1 on a mismatch.
"""
import argparse
import csv
import json
import os
import sys
from collections import defaultdict
from datetime import date, datetime, time, timedelta
from fractions import Fraction
from zoneinfo import ZoneInfo

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "data")

AIRPORT_MIN = {"ATL": (110, 60), "BOS": (105, 40), "DCA": (100, 35), "LAX": (125, 65), "SEA": (105, 50),
               "SFO": (105, 45), "AMS": (90, 45), "CDG": (90, 45), "ORY": (90, 45)}
RAIL_MIN = (15, 10)
SLUGS = ["early_morning", "am", "midday", "pm", "late_evening"]
BOUNDS = [420, 600, 960, 1140, 1440]
BINS = ["<4h", "4h-4h30", "4h30-5h", ">=5h"]


def period_of(local):
    m = local.hour * 60 + local.minute
    for i, b in enumerate(BOUNDS):
        if m < b:
            return i + 1
    raise ValueError(local)


def rows(name):
    with open(os.path.join(DATA, name), newline="") as f:
        return list(csv.DictReader(f))


def read_conf():
    conf = {}
    with open(os.path.join(DATA, "run.conf")) as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("#"):
                k, v = line.split("=", 1)
                conf[k.strip()] = v.strip()
    return conf


def localize(text, tz):
    return datetime.fromisoformat(text).replace(tzinfo=tz)


class Fixture:
    def __init__(self, dep_proc, arr_proc):
        conf = read_conf()
        self.start = date.fromisoformat(conf["from_date"])
        self.end = date.fromisoformat(conf["to_date"])
        self.origins = conf["origin_zone"].split(",")
        self.stations = {}
        for r in rows("stations.csv"):
            if r["kind"] == "air" and dep_proc is not None:
                dwell = (dep_proc, arr_proc)
            elif r["t_sec_dep_min"]:
                dwell = (float(r["t_sec_dep_min"]), float(r["t_arr_min"]))
            else:
                dwell = AIRPORT_MIN[r["station_id"]] if r["kind"] == "air" else RAIL_MIN
            r["dwell_s"] = (round(dwell[0] * 60), round(dwell[1] * 60))
            r["tzinfo"] = ZoneInfo(r["tz"])
            self.stations[r["station_id"]] = r
        with open(os.path.join(DATA, "zones.geojson")) as f:
            props = [feat["properties"] for feat in json.load(f)["features"]]
        self.zones = {p["zone_id"] for p in props}
        self.densities = {p["zone_id"]: p.get("population_density") for p in props}
        self.rides = {}
        for r in rows("ride_stats.csv"):
            key = (r["origin_zone"], r["dest_zone"], date.fromisoformat(r["date"]), int(r["period"]))
            self.rides[key] = (int(r["mean_s"]), int(r["min_s"]), int(r["max_s"]))
        self.segments = [self.segment(r) for r in rows("segments.csv")] + self.expand()

    def segment(self, r):
        dep_tz = self.stations[r["dep_station"]]["tzinfo"]
        arr_tz = self.stations[r["arr_station"]]["tzinfo"]
        return {
            "id": r["segment_id"], "mode": r["mode_id"], "dep": r["dep_station"], "arr": r["arr_station"],
            "sched_dep": localize(r["sched_dep"], dep_tz), "sched_arr": localize(r["sched_arr"], arr_tz),
            "actual_dep": localize(r["actual_dep"], dep_tz) if r["actual_dep"] else None,
            "actual_arr": localize(r["actual_arr"], arr_tz) if r["actual_arr"] else None,
            "cancelled": r["cancelled"] == "1",
        }

    def expand(self):
        out = []
        for r in rows("weekly_schedule.csv"):
            d = self.start
            while d <= self.end:
                if r["days"][d.weekday()] == "1":
                    dep_t, arr_t = time.fromisoformat(r["dep_time"]), time.fromisoformat(r["arr_time"])
                    arr_d = d + timedelta(days=1) if arr_t < dep_t else d
                    dep = datetime.combine(d, dep_t, self.stations[r["dep_station"]]["tzinfo"])
                    arr = datetime.combine(arr_d, arr_t, self.stations[r["arr_station"]]["tzinfo"])
                    out.append({"id": None, "mode": r["mode_id"], "dep": r["dep_station"], "arr": r["arr_station"],
                                "sched_dep": dep, "sched_arr": arr, "actual_dep": dep, "actual_arr": arr,
                                "cancelled": False})
                d += timedelta(days=1)
        return out

    def ride(self, o, dz, when, tz):
        local = when.astimezone(tz)
        d, p = local.date(), period_of(local)
        return self.rides.get((o, dz, d, p)) or self.rides.get((o, dz, d, 0))

    def trips(self):
        out = []
        for s in self.segments:
            if s["cancelled"] or s["actual_dep"] is None:
                continue
            dep, arr = self.stations[s["dep"]], self.stations[s["arr"]]
            t_sec, t_arr = dep["dwell_s"][0], arr["dwell_s"][1]
            in_s = int((s["actual_arr"] - s["actual_dep"]).total_seconds())
            wait = max(0, int((s["actual_dep"] - s["sched_dep"]).total_seconds()))
            deadline = s["sched_dep"] - timedelta(seconds=t_sec)
            egress_start = s["actual_arr"] + timedelta(seconds=t_arr)
            dests = sorted({k[1] for k in self.rides if k[0] == arr["zone_id"]} & self.zones)
            for origin in self.origins:
                for dz in dests:
                    to = self.ride(origin, dep["zone_id"], deadline, dep["tzinfo"])
                    fr = self.ride(arr["zone_id"], dz, egress_start, arr["tzinfo"])
                    if to is None or fr is None:
                        continue
                    door = (egress_start + timedelta(seconds=fr[0])).astimezone(arr["tzinfo"])
                    if not self.start <= door.date() <= self.end:
                        continue
                    fixed = t_sec + wait + in_s + t_arr
                    out.append({"zone": dz, "period": period_of(door), "date": door.date(), "mode": s["mode"],
                                "total": fixed + to[0] + fr[0],
                                "spread": (to[2] + fr[2]) - (to[1] + fr[1])})
        return out


def summaries(trips, days_total):
    acc = defaultdict(lambda: [0, 0, 0])
    for t in trips:
        a = acc[(t["zone"], t["period"], t["date"], t["mode"])]
        a[0] += t["total"]
        a[1] += t["spread"]
        a[2] += 1
    modes = sorted({k[3] for k in acc})
    cells = defaultdict(lambda: defaultdict(dict))
    for (z, p, d, m), (tot, spr, n) in acc.items():
        cells[(z, p)][d][m] = (Fraction(tot, n), Fraction(spr, n))
    out = {}
    for key, days in cells.items():
        fast = {m: 0 for m in modes}
        rel = {m: 0 for m in modes}
        e_sum = Fraction(0)
        for per_mode in days.values():
            best_e = min(v[0] for v in per_mode.values())
            best_v = min(v[1] for v in per_mode.values())
            e_sum += best_e
            for m, (e, v) in per_mode.items():
                fast[m] += e == best_e
                rel[m] += v == best_v
        e_bar = e_sum / len(days)
        minutes = e_bar / 60
        b = 0 if minutes < 240 else 1 if minutes < 270 else 2 if minutes < 300 else 3

        def winner(c):
            top = max(c.values())
            return min(m for m in modes if c[m] == top) if top > 0 else ""

        out[key] = {"fast": fast, "rel": rel, "fastest": winner(fast), "reliable": winner(rel),
                    "e_bar": e_bar, "days": len(days), "days_total": days_total, "bin": b}
    return modes, out


def delay(fx, seg_id):
    s = next(x for x in fx.segments if x["id"] == seg_id)
    arr = fx.stations[s["arr"]]
    t_arr = arr["dwell_s"][1]

    def slot(when):
        local = (when + timedelta(seconds=t_arr)).astimezone(arr["tzinfo"])
        return local.date(), period_of(local)

    sd, sp = slot(s["sched_arr"])
    ad, ap = slot(s["actual_arr"])
    dests = sorted({k[1] for k in fx.rides if k[0] == arr["zone_id"]} & fx.zones)
    used, excluded = [], []
    for z in dests:
        a = fx.rides.get((arr["zone_id"], z, ad, ap))
        b = fx.rides.get((arr["zone_id"], z, sd, sp))
        if a and b:
            used.append((z, a[0] - b[0], a[2] - b[2], fx.densities.get(z)))
        else:
            excluded.append(z)
    dens = [u[3] for u in used]
    uniform = any(d is None for d in dens) or sum(dens) <= 0
    w = [Fraction(1)] * len(used) if uniform else [Fraction(d) for d in dens]
    mean = sum(wi * u[1] for wi, u in zip(w, used)) / sum(w)
    head = {"segment_id": seg_id, "scheduled_egress_period": SLUGS[sp - 1], "scheduled_egress_date": str(sd),
            "actual_egress_period": SLUGS[ap - 1], "actual_egress_date": str(ad),
            "weighted_mean_delta_s": float(mean), "max_of_max_delta_s": max(u[2] for u in used),
            "zones_used": len(used), "zones_excluded": len(excluded), "uniform_weights": str(uniform).lower()}
    zones = [{"zone_id": u[0], "mean_delta_s": u[1], "max_delta_s": u[2], "weight": float(wi / sum(w))}
             for u, wi in zip(used, w)]
    return head, zones


def expected_tables(modes, summ):
    keys = sorted(summ)
    fastest, times, rel = [], [], []
    for z, p in keys:
        s = summ[(z, p)]
        slug = SLUGS[p - 1]
        fastest.append([z, slug, s["fastest"], s["days"]] + [s["fast"][m] for m in modes])
        times.append([z, slug, s["fastest"], s["e_bar"] / 60, BINS[s["bin"]], s["days"], s["days_total"]])
        rel.append([z, slug, s["reliable"], s["fastest"], s["days"]] + [s["rel"][m] for m in modes])
    interval = []
    for m in modes:
        for p in range(1, 6):
            for b, label in enumerate(BINS):
                n = sum(1 for (z, pp), s in summ.items() if pp == p and s["fastest"] == m and s["bin"] == b)
                interval.append([m, SLUGS[p - 1], label, n])
    return {"fastest.csv": fastest, "fastest_time.csv": times, "reliability.csv": rel, "interval_table.csv": interval}


def same(expected, got):
    if isinstance(expected, (Fraction, float)):
        return abs(float(expected) - float(got)) <= 5e-5 * max(1.0, abs(float(expected)))
    return str(expected) == got


def compare(path, expected_rows):
    with open(path, newline="") as f:
        got = list(csv.reader(f))[1:]
    if len(got) != len(expected_rows):
        return [f"{path}: {len(got)} rows, expected {len(expected_rows)}"]
    errors = []
    for i, (e, g) in enumerate(zip(expected_rows, got)):
        if len(e) != len(g) or not all(same(a, b) for a, b in zip(e, g)):
            errors.append(f"{path} row {i + 2}: got {g}, expected {[str(x) for x in e]}")
    return errors


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out_dir")
    ap.add_argument("--dep-proc", type=float)
    ap.add_argument("--arr-proc", type=float)
    ap.add_argument("--delay")
    args = ap.parse_args()
    if (args.dep_proc is None) != (args.arr_proc is None):
        ap.error("--dep-proc and --arr-proc go together")

    fx = Fixture(args.dep_proc, args.arr_proc)
    trips = fx.trips()
    modes, summ = summaries(trips, (fx.end - fx.start).days + 1)
    errors = []
    checked = 0
    for name, rows_ in expected_tables(modes, summ).items():
        path = os.path.join(args.out_dir, name)
        if os.path.exists(path):
            errors += compare(path, rows_)
            checked += 1
    if args.delay:
        head, zones = delay(fx, args.delay)
        errors += compare(os.path.join(args.out_dir, "delay.csv"), [list(head.values())])
        errors += compare(os.path.join(args.out_dir, "delay_zones.csv"), [list(z.values()) for z in zones])
        checked += 2
    if checked == 0:
        errors.append(f"no output files found in {args.out_dir}")
    for e in errors:
        print(e)
    print(f"{'OK' if not errors else 'MISMATCH'}: {len(trips)} trips, {len(summ)} zone-periods, {checked} files")
    sys.exit(1 if errors else 0)


if __name__ == "__main__":
    main()
