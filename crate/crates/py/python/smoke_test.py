#!/usr/bin/env python3
"""Smoke test of the door2door extension on the bundled golden fixture.

Build and install first, e.g. `maturin build --release -m crates/py/Cargo.toml`
then `pip install target/wheels/door2door-*.whl`.
"""
import math
import os
import sys

import door2door as d2d

ROOT = os.path.dirname(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))
DATA = os.path.join(ROOT, "crates", "cli", "tests", "fixtures", "golden", "data")


def check(cond, msg):
    if not cond:
        print(f"FAIL {msg}")
        sys.exit(1)
    print(f"ok   {msg}")


def main():
    check(d2d.classify_period(419) == "early_morning" and d2d.classify_period(420) == "am", "period boundary")
    check(abs(d2d.geodesic_distance(0, 0, 0, 1) - 111.1949) < 1e-3, "one degree of longitude")
    check(d2d.default_dwell("LAX") == (125, 65) and d2d.default_dwell("XXX") is None, "dwell table")
    slope, icpt = d2d.ols_fit([1.0, 2.0, 3.0, 4.0], [5.8, 6.6, 7.4, 8.2])
    check(math.isclose(slope, 0.8) and math.isclose(icpt, 5.0), "ols fit")
    try:
        d2d.classify_period(1440)
        check(False, "minute 1440 rejected")
    except ValueError:
        check(True, "minute 1440 rejected")

    f = lambda name: os.path.join(DATA, name)
    engine = d2d.Engine.load(
        f("ride_stats.csv"), f("stations.csv"), f("zones.geojson"), "2018-01-01", "2018-01-07",
        segments=f("segments.csv"), weekly_schedule=f("weekly_schedule.csv"), origin_zones=["A1"],
    )
    check(engine.n_segments == 45, "45 segments after expansion")
    trips = engine.trips()
    check(all(t["total_s"] == t["t_to_s"] + t["t_dep_s"] + t["t_in_s"] + t["t_arr_s"] + t["t_from_s"] for t in trips),
          f"{len(trips)} trips add up")
    summaries = engine.summaries()
    check(all(s["days_used"] <= s["days_total"] == 7 for s in summaries), f"{len(summaries)} summaries")
    num, den = summaries[0]["e_bar_s"]
    check(math.isclose(num / den / 60, summaries[0]["e_bar_min"]), "exact and float averages agree")

    w = engine.what_if(60, 30)
    em = lambda rows: [s for s in rows if s["period"] == "early_morning" and s["fastest_counts"].get("CDG", 0) > 0]
    check(em(w["baseline"]) and not em(w["scenario"]), "early morning loses CDG at 60/30")
    check(engine.what_if(90, 45)["scenario"] == summaries, "default dwell reproduces the baseline")

    legs = engine.legs()
    check(all(abs(sum(l[k] for k in ("to_pct", "dep_pct", "in_pct", "arr_pct", "from_pct")) - 100) < 1e-9 for l in legs),
          "leg shares sum to 100")
    ranked = [f["station_id"] for f in engine.integration()]
    check(ranked == ["CDG", "ORY"], "CDG better integrated than ORY")

    delay = engine.delay("AF1241")
    check(delay["scheduled_egress_period"] == "midday" and delay["actual_egress_period"] == "pm", "delay periods")
    check(delay["weighted_mean_delta_s"] > 0, "late arrival costs extra egress time")
    try:
        engine.delay("NOPE")
        check(False, "unknown segment raises KeyError")
    except KeyError:
        check(True, "unknown segment raises KeyError")
    print("smoke test passed")


if __name__ == "__main__":
    main()
