#!/usr/bin/env python3
"""Regenerates data/synthetic30_prices.csv: 30 assets, 5 years of daily closes.

Returns follow a one-market, three-sector factor model with annual vols in
[0.18, 0.45]. Trading days are weekdays minus a fixed German-style holiday
calendar, so the annualized time step lands near 0.00395.
"""
import argparse
import datetime as dt

import numpy as np


def easter(year: int) -> dt.date:
    a = year % 19
    b, c = divmod(year, 100)
    d, e = divmod(b, 4)
    f = (b + 8) // 25
    g = (b - f + 1) // 3
    h = (19 * a + b - d - g + 15) % 30
    i, k = divmod(c, 4)
    l = (32 + 2 * e + 2 * i - h - k) % 7
    m = (a + 11 * h + 22 * l) // 451
    month, day = divmod(h + l - 7 * m + 114, 31)
    return dt.date(year, month, day + 1)


def holidays(year: int) -> set:
    e = easter(year)
    fixed = [(1, 1), (5, 1), (10, 3), (12, 24), (12, 25), (12, 26), (12, 31)]
    moving = [-2, 1, 39, 50, 60]  # Good Friday .. Corpus Christi
    return {dt.date(year, m, d) for m, d in fixed} | {e + dt.timedelta(days=k) for k in moving}


def trading_days(start: dt.date, end: dt.date) -> list:
    out, day = [], start
    hol = set().union(*(holidays(y) for y in range(start.year, end.year + 1)))
    while day <= end:
        if day.weekday() < 5 and day not in hol:
            out.append(day)
        day += dt.timedelta(days=1)
    return out


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/synthetic30_prices.csv")
    ap.add_argument("--seed", type=int, default=20240531)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    n, n_sectors = 30, 3
    days = trading_days(dt.date(2017, 1, 2), dt.date(2021, 12, 30))
    n_ret = len(days) - 1
    step = 1.0 / 252.0

    vols = rng.uniform(0.18, 0.45, n)
    sector = np.arange(n) % n_sectors
    beta_m = rng.uniform(0.2, 0.4, n)
    beta_s = rng.uniform(0.15, 0.3, n)
    load = np.zeros((n, 1 + n_sectors))
    load[:, 0] = beta_m
    load[np.arange(n), 1 + sector] = beta_s
    systematic = (load ** 2).sum(axis=1)
    idio = np.sqrt(np.maximum(1.0 - systematic, 0.05))
    drift = rng.uniform(0.0, 0.16, n)

    factors = rng.standard_normal((n_ret, 1 + n_sectors))
    eps = rng.standard_normal((n_ret, n))
    z = factors @ load.T + eps * idio
    z /= np.sqrt(systematic + idio ** 2)
    rets = drift * step + z * vols * np.sqrt(step)

    prices = np.empty((n_ret + 1, n))
    prices[0] = rng.uniform(20.0, 200.0, n)
    for t in range(n_ret):
        prices[t + 1] = prices[t] * (1.0 + rets[t])

    names = [f"S{i + 1:02d}" for i in range(n)]
    with open(args.out, "w", encoding="ascii") as fh:
        fh.write("date," + ",".join(names) + "\n")
        for day, row in zip(days, prices):
            fh.write(day.isoformat() + "," + ",".join(f"{p:.4f}" for p in row) + "\n")


if __name__ == "__main__":
    main()
