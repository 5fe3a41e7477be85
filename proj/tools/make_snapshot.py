#!/usr/bin/env python3
"""Regenerate data/snapshot_2020-07-21.csv.

The bundled file is a deterministic reconstruction of a mid-2020 daily case
extract (22 Jan .. 21 Jul 2020, 207 countries). Populations and densities are
rounded 2020 figures; each country's daily new-case curve is rebuilt from a
handful of rounded statistics (first case date, approximate total by 21 Jul,
smoothed peak date/height, level at the end of the window) and then perturbed
with seeded reporting noise and a weekday cycle. It is NOT the original
worldometer data and must not be read as such.

A few deliberate defects are injected (blank cells, missing dates, downward
corrections) so that the ingest repair path is exercised on real input.

Shape syntax (components joined by '+'):
  W:MM-DD:height:floor[:total]  single wave peaking at MM-DD with the given
                                smoothed height, decaying to `floor` afterwards
  G:level[:total]               still-growing power-law curve reaching `level`
                                cases/day on the last day
When a component omits `total` it takes whatever the country total leaves.
"""

import argparse
import datetime as dt
import math

import numpy as np

START = dt.date(2020, 1, 22)
END = dt.date(2020, 7, 21)
SEED = 20200721

# name | continent | population (millions) | density (per km2) | first case | total by END | shape
TABLE = """
China|Asia|1439.3|153|01-22|83700|W:02-07:3500:20
India|Asia|1380.0|464|01-30|1193000|G:37000
Indonesia|Asia|273.5|151|03-02|89900|G:1650
Pakistan|Asia|220.9|287|02-26|267400|W:06-14:6300:1200
Bangladesh|Asia|164.7|1265|03-08|210500|W:07-02:3700:2900
Japan|Asia|126.5|347|01-22|26300|W:04-11:580:40:18000+G:650
Philippines|Asia|109.6|368|01-30|70800|G:2000
Vietnam|Asia|97.3|314|01-23|396|W:03-28:15:1
Iran|Asia|84.0|52|02-19|278800|W:03-31:3000:0:95000+W:06-08:3300:2400
Turkey|Asia|84.3|110|03-11|221500|W:04-12:4700:930
Thailand|Asia|69.8|137|01-22|3250|W:03-25:130:3
Myanmar|Asia|54.4|83|03-23|340|W:04-16:12:2
South Korea|Asia|51.3|527|01-22|13800|W:03-01:700:45
Iraq|Asia|40.2|93|02-24|94700|G:2400
Afghanistan|Asia|38.9|60|02-24|35500|W:06-10:650:150
Saudi Arabia|Asia|34.8|16|03-02|253300|W:06-17:4600:2300
Uzbekistan|Asia|33.5|79|03-15|18700|G:600
Malaysia|Asia|32.4|99|01-25|8800|W:04-05:170:8
Yemen|Asia|29.8|56|04-10|1620|W:06-01:35:10
Nepal|Asia|29.1|203|01-24|18100|W:06-18:520:100
Taiwan|Asia|23.8|673|01-22|451|W:03-22:20:1
Sri Lanka|Asia|21.4|341|01-27|2700|W:04-28:60:8
Kazakhstan|Asia|18.8|7|03-13|71800|G:1700
Syria|Asia|17.5|95|03-22|550|G:25
Cambodia|Asia|16.7|95|01-27|190|W:03-24:10:2
Jordan|Asia|10.2|115|03-02|1170|W:06-20:25:5
Azerbaijan|Asia|10.1|123|02-28|28000|W:06-25:560:430
UAE|Asia|9.9|118|01-29|57500|W:05-20:830:270
Tajikistan|Asia|9.5|68|04-30|7000|W:05-28:130:45
Israel|Asia|8.66|400|02-21|56700|W:04-02:560:20:17000+G:1700
Hong Kong|Asia|7.5|7140|01-23|2100|W:03-30:45:2:600+G:85
Laos|Asia|7.28|32|03-24|19|W:04-01:1:0
Lebanon|Asia|6.83|667|02-21|2900|G:100
Kyrgyzstan|Asia|6.5|34|03-18|31300|G:900
Singapore|Asia|5.85|8358|01-23|48000|W:04-20:900:230
Oman|Asia|5.1|16|02-24|70000|G:1300
State of Palestine|Asia|5.1|847|03-05|9100|G:420
Kuwait|Asia|4.27|240|02-24|59200|W:05-24:950:650
Georgia|Asia|3.99|57|02-26|1000|W:04-20:15:5
Mongolia|Asia|3.28|2|03-10|290|W:06-10:5:1
Armenia|Asia|2.96|104|03-01|36200|W:06-18:640:380
Qatar|Asia|2.88|248|02-29|107000|W:05-30:1850:450
Bahrain|Asia|1.70|2239|02-21|37600|W:06-10:600:450
Timor-Leste|Asia|1.32|89|03-21|24|W:04-15:2:0
Bhutan|Asia|0.77|20|03-06|90|W:06-01:3:1
Maldives|Asia|0.54|1802|03-08|2900|W:05-25:70:20
Brunei|Asia|0.44|83|03-09|141|W:03-20:8:0
Macao|Asia|0.65|21645|01-22|46|W:03-25:2:0
Russia|Europe|145.9|9|01-31|783300|W:05-11:10800:5800
Germany|Europe|83.8|240|01-27|203300|W:04-02:6000:450
UK|Europe|67.9|281|01-31|295400|W:04-10:5200:650
France|Europe|65.3|119|01-24|211100|W:04-01:5000:700
Italy|Europe|60.5|206|01-31|244800|W:03-22:5600:220
Spain|Europe|46.8|94|02-01|307300|W:03-27:7800:500
Ukraine|Europe|43.7|75|03-03|60200|G:870
Poland|Europe|37.8|124|03-04|40400|W:06-10:420:330
Romania|Europe|19.2|84|02-26|38100|W:04-12:370:150:18000+G:800
Netherlands|Europe|17.1|508|02-27|52000|W:04-08:1150:120
Belgium|Europe|11.6|383|02-04|64000|W:04-12:1450:170
Czechia|Europe|10.7|139|03-01|14300|W:03-28:300:40:7000+G:200
Greece|Europe|10.4|81|02-26|4000|W:03-30:90:30
Portugal|Europe|10.2|111|03-02|49000|W:04-10:750:280
Sweden|Europe|10.1|25|01-31|78000|W:06-18:1100:280
Hungary|Europe|9.66|107|03-04|4300|W:04-08:80:20
Belarus|Europe|9.45|47|02-28|66300|W:05-01:930:150
Austria|Europe|9.0|109|02-25|19700|W:03-27:750:110
Serbia|Europe|8.74|100|03-06|21000|W:04-15:300:80:10000+G:380
Switzerland|Europe|8.65|219|02-25|33600|W:03-24:1000:120
Bulgaria|Europe|6.95|64|03-08|9000|G:250
Denmark|Europe|5.79|137|02-27|13200|W:04-08:320:35
Finland|Europe|5.54|18|01-29|7300|W:04-03:150:8
Slovakia|Europe|5.46|114|03-06|2000|W:03-28:50:12
Norway|Europe|5.42|15|02-26|9000|W:03-25:260:12
Ireland|Europe|4.94|72|02-29|25800|W:04-12:780:20
Croatia|Europe|4.1|73|02-25|4500|W:03-28:60:15:2300+G:90
Moldova|Europe|4.03|123|03-07|22500|G:330
Bosnia and Herzegovina|Europe|3.28|64|03-05|9000|G:280
Albania|Europe|2.88|105|03-09|4300|G:110
Lithuania|Europe|2.72|43|02-28|1950|W:04-12:60:10
North Macedonia|Europe|2.08|83|02-26|9300|W:06-15:170:110
Slovenia|Europe|2.08|103|03-04|1900|W:03-25:45:15
Latvia|Europe|1.89|30|03-02|1200|W:04-05:25:3
Estonia|Europe|1.33|31|02-27|2000|W:03-28:60:2
Cyprus|Europe|1.21|131|03-09|1030|W:04-03:30:3
Montenegro|Europe|0.63|47|03-17|2000|G:90
Luxembourg|Europe|0.63|242|02-29|5300|W:03-25:180:60
Malta|Europe|0.44|1380|03-07|680|W:04-05:25:2
Iceland|Europe|0.34|3|02-28|1900|W:03-28:75:2
Channel Islands|Europe|0.174|915|03-09|580|W:04-05:18:0
Isle of Man|Europe|0.085|149|03-19|340|W:04-08:12:0
Andorra|Europe|0.077|164|03-02|880|W:04-01:30:1
Faeroe Islands|Europe|0.049|35|03-04|200|W:03-22:10:1
Monaco|Europe|0.039|26337|02-29|110|W:03-30:5:0
Liechtenstein|Europe|0.038|238|03-03|87|W:03-25:5:0
Gibraltar|Europe|0.034|3369|03-03|180|W:04-05:6:1
San Marino|Europe|0.034|566|02-27|700|W:03-25:25:0
Holy See|Europe|0.0008|2003|03-06|12|W:03-28:1:0
USA|North America|331.0|36|01-22|3960000|W:04-10:31000:20000:2300000+G:46000
Mexico|North America|128.9|66|02-28|356300|G:6500
Canada|North America|37.7|4|01-25|111700|W:05-03:1750:420
Guatemala|North America|17.9|167|03-14|37000|G:900
Haiti|North America|11.4|414|03-20|7000|W:06-12:180:30
Cuba|North America|11.3|106|03-12|2440|W:04-20:55:4
Dominican Republic|North America|10.8|225|03-02|54800|G:1100
Honduras|North America|9.9|89|03-11|32800|G:800
Nicaragua|North America|6.6|55|03-19|3400|G:80
El Salvador|North America|6.49|313|03-19|12200|G:360
Costa Rica|North America|5.09|100|03-06|11800|G:600
Panama|North America|4.31|58|03-10|56800|G:1200
Jamaica|North America|2.96|273|03-11|780|W:04-20:18:4
Trinidad and Tobago|North America|1.40|273|03-13|140|W:03-28:7:0
Puerto Rico|North America|2.86|323|03-15|10000|G:300
Belize|North America|0.40|17|03-23|50|G:3
Bahamas|North America|0.39|39|03-15|150|W:04-10:4:3
Martinique|North America|0.375|354|03-05|270|W:03-28:8:1
Guadeloupe|North America|0.40|237|03-12|190|W:03-28:6:1
Barbados|North America|0.29|668|03-17|105|W:04-05:4:0
Saint Lucia|North America|0.18|301|03-14|24|W:04-01:1:0
Curaçao|North America|0.164|370|03-13|25|W:03-25:1:0
Grenada|North America|0.11|331|03-22|23|W:04-01:1:0
Saint Vincent and the Grenadines|North America|0.11|284|03-11|39|W:04-15:1:0
Aruba|North America|0.107|593|03-13|110|W:03-28:5:0
Antigua and Barbuda|North America|0.098|223|03-13|76|W:06-20:2:0
Dominica|North America|0.072|96|03-22|18|W:04-01:1:0
Cayman Islands|North America|0.066|274|03-13|200|W:04-20:6:0
Bermuda|North America|0.062|1246|03-18|150|W:04-10:5:0
Greenland|North America|0.057|0.14|03-16|13|W:03-25:1:0
Saint Kitts and Nevis|North America|0.053|205|03-25|17|W:04-01:1:0
Sint Maarten|North America|0.043|1261|03-17|80|W:04-05:3:0
Saint Martin|North America|0.039|730|03-01|45|W:04-01:1:0
Turks and Caicos|North America|0.039|41|03-23|100|G:8
Brazil|South America|212.6|25|02-26|2120000|G:38000
Colombia|South America|50.9|46|03-06|204000|G:7000
Argentina|South America|45.2|17|03-03|131600|G:3800
Peru|South America|33.0|26|03-06|357700|W:06-01:5600:3600
Venezuela|South America|28.4|32|03-14|12300|G:450
Chile|South America|19.1|26|03-03|334700|W:06-14:6300:2100
Ecuador|South America|17.6|71|03-01|74600|W:04-24:1300:1050
Bolivia|South America|11.7|11|03-11|60800|G:1600
Paraguay|South America|7.13|18|03-08|4000|G:170
Uruguay|South America|3.47|20|03-14|1100|W:04-10:18:6
Guyana|South America|0.79|4|03-12|340|G:8
Suriname|South America|0.59|4|03-14|1130|W:06-25:45:20
French Guiana|South America|0.30|4|03-05|7500|W:06-25:200:60
Nigeria|Africa|206.1|226|02-28|37200|G:600
Ethiopia|Africa|115.0|115|03-13|10200|G:420
Egypt|Africa|102.3|103|02-14|88400|W:06-19:1550:600
DRC|Africa|89.6|40|03-10|8500|G:130
Tanzania|Africa|59.7|67|03-16|509|W:04-25:25:0
South Africa|Africa|59.3|49|03-05|373600|G:13000
Kenya|Africa|53.8|94|03-13|14200|G:550
Uganda|Africa|45.7|229|03-21|1070|W:05-25:20:10
Algeria|Africa|43.9|18|02-25|23700|G:600
Sudan|Africa|43.8|25|03-13|11000|W:06-05:200:50
Morocco|Africa|36.9|83|03-02|17500|G:350
Angola|Africa|32.9|26|03-20|780|G:35
Mozambique|Africa|31.3|40|03-22|1640|G:50
Ghana|Africa|31.1|137|03-12|28400|W:07-01:640:520
Madagascar|Africa|27.7|48|03-20|7150|G:330
Cameroon|Africa|26.5|56|03-06|16200|W:06-10:350:110
Ivory Coast|Africa|26.4|83|03-11|14000|W:06-18:320:190
Niger|Africa|24.2|19|03-19|1100|W:04-20:25:1
Burkina Faso|Africa|20.9|76|03-09|1100|W:04-10:20:5
Mali|Africa|20.25|17|03-25|2500|W:05-20:45:8
Malawi|Africa|19.1|203|04-02|3000|G:120
Zambia|Africa|18.4|25|03-18|3600|G:170
Senegal|Africa|16.7|87|03-02|9000|W:06-15:140:100
Chad|Africa|16.4|13|03-19|880|W:05-08:18:1
Somalia|Africa|15.9|25|03-16|3100|W:05-10:80:8
Zimbabwe|Africa|14.9|38|03-20|1900|G:90
Guinea|Africa|13.1|53|03-12|6600|W:05-12:120:60
Rwanda|Africa|12.95|525|03-14|1700|G:50
Benin|Africa|12.1|108|03-16|1600|W:06-30:60:45
Burundi|Africa|11.9|463|03-31|350|G:12
Tunisia|Africa|11.8|76|03-02|1320|W:04-05:35:8
South Sudan|Africa|11.2|18|04-05|2200|W:06-01:60:5
Togo|Africa|8.28|152|03-06|800|W:06-15:15:10
Sierra Leone|Africa|7.98|111|03-31|1700|W:05-25:35:10
Libya|Africa|6.87|4|03-24|2200|G:110
Congo|Africa|5.52|16|03-14|2850|G:110
Liberia|Africa|5.06|53|03-16|1100|W:06-15:20:8
Central African Republic|Africa|4.83|8|03-14|4500|W:06-08:110:25
Mauritania|Africa|4.65|5|03-13|5600|W:06-15:150:20
Eritrea|Africa|3.55|35|03-21|250|W:06-20:10:2
Namibia|Africa|2.54|3|03-13|1500|G:90
Gambia|Africa|2.42|239|03-17|110|G:8
Botswana|Africa|2.35|4|03-30|540|G:25
Gabon|Africa|2.23|9|03-12|6400|W:06-20:150:70
Lesotho|Africa|2.14|71|05-13|360|G:25
Guinea-Bissau|Africa|1.97|70|03-25|1900|W:05-15:60:5
Equatorial Guinea|Africa|1.40|50|03-14|3000|W:05-25:100:15
Mauritius|Africa|1.27|626|03-18|342|W:04-02:15:0
Eswatini|Africa|1.16|67|03-14|2000|G:80
Djibouti|Africa|0.99|43|03-18|5000|W:05-20:180:10
Réunion|Africa|0.90|358|03-11|600|W:03-30:12:3
Comoros|Africa|0.87|467|04-30|330|W:06-05:12:2
Western Sahara|Africa|0.60|2|04-05|10|W:04-10:1:0
Cabo Verde|Africa|0.56|138|03-20|2000|G:40
Mayotte|Africa|0.27|727|03-14|2800|W:05-15:60:5
Sao Tome and Principe|Africa|0.22|228|04-06|740|W:05-20:25:2
Seychelles|Africa|0.098|214|03-14|100|G:5
Australia|Australia/Oceania|25.5|3|01-25|12400|W:03-28:400:10:7500+G:420
Papua New Guinea|Australia/Oceania|8.95|20|03-20|30|G:3
New Zealand|Australia/Oceania|4.82|18|02-28|1556|W:04-02:70:0
Fiji|Australia/Oceania|0.90|49|03-19|26|W:04-05:2:0
New Caledonia|Australia/Oceania|0.29|16|03-19|21|W:03-28:2:0
French Polynesia|Australia/Oceania|0.28|77|03-12|62|W:03-30:3:0
"""

WEEKDAY = [1.05, 1.05, 1.08, 1.04, 1.02, 0.86, 0.90]  # Mon..Sun


def parse_date(md):
    m, d = md.split("-")
    return dt.date(2020, int(m), int(d))


def wave(n, peak, height, floor, sigma):
    t = np.arange(n, dtype=float)
    up = height * np.exp(-((t - peak) ** 2) / (2.0 * sigma ** 2))
    down = floor + (height - floor) * np.exp(-((t - peak) ** 2) / (2.0 * (1.5 * sigma) ** 2))
    return np.where(t <= peak, up, down)


def fit_wave(n, peak, height, floor, total):
    lo, hi = 0.5, 400.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if wave(n, peak, height, floor, mid).sum() < total:
            lo = mid
        else:
            hi = mid
    return wave(n, peak, height, floor, 0.5 * (lo + hi))


def growth(n, level, total):
    k = max(0.0, level * n / max(total, 1.0) - 1.0)
    t = np.arange(n, dtype=float)
    return level * ((t + 1.0) / n) ** k


def intensity(first, total, shape):
    n = (END - first).days + 1
    comps = shape.split("+")
    explicit = 0.0
    for c in comps:
        f = c.split(":")
        if (f[0] == "W" and len(f) == 5) or (f[0] == "G" and len(f) == 3):
            explicit += float(f[-1])
    lam = np.zeros(n)
    for c in comps:
        f = c.split(":")
        if f[0] == "W":
            share = float(f[4]) if len(f) == 5 else total - explicit
            peak = (parse_date(f[1]) - first).days
            lam += fit_wave(n, peak, float(f[2]), float(f[3]), share)
        else:
            share = float(f[2]) if len(f) == 3 else total - explicit
            lam += growth(n, float(f[1]), share)
    return np.maximum(lam, 0.0)


def simulate(rng, first, total, shape):
    lam = intensity(first, total, shape)
    n = lam.size
    days = [first + dt.timedelta(days=i) for i in range(n)]
    week = np.array([WEEKDAY[d.weekday()] for d in days])
    noise = np.exp(rng.normal(0.0, 0.18, n))
    daily = rng.poisson(lam * week * noise).astype(np.int64)
    daily[0] = max(daily[0], 1)
    cum = np.cumsum(daily)
    return days, cum


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/snapshot_2020-07-21.csv")
    args = ap.parse_args()

    rng = np.random.default_rng(SEED)
    rows = []
    names = set()
    for line in TABLE.strip().splitlines():
        name, cont, pop, dens, first, total, shape = line.split("|")
        assert name not in names, name
        names.add(name)
        population = int(round(float(pop) * 1e6))
        first_day = parse_date(first)
        days, cum = simulate(rng, first_day, float(total), shape)
        n = len(days)
        cfr = rng.uniform(0.005, 0.06)
        deaths = np.floor(np.concatenate([np.zeros(10), cum[:-10]])[:n] * cfr).astype(np.int64)
        recovered = np.floor(np.concatenate([np.zeros(18), cum[:-18]])[:n] * 0.85).astype(np.int64)
        active = cum - deaths - recovered

        # Reporting defects that ingest must repair.
        blank = set()
        dropped = set()
        if n > 30 and rng.uniform() < 0.10:
            blank.add(int(rng.integers(5, n - 1)))
        if n > 30 and rng.uniform() < 0.06:
            dropped.add(int(rng.integers(5, n - 1)))
        if n > 30 and rng.uniform() < 0.06:
            t = int(rng.integers(5, n - 2))
            cum[t] = max(0, cum[t] - max(1, (cum[t] - cum[t - 1]) * 2))

        for i, d in enumerate(days):
            if i in dropped:
                continue
            tc = "" if i in blank else str(int(cum[i]))
            rows.append((d.isoformat(), name, cont, str(population), f"{float(dens):g}", tc,
                         str(int(deaths[i])), str(int(recovered[i])), str(int(active[i]))))

    rows.sort(key=lambda r: (r[1], r[0]))
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("date,country,continent,population,population_density,total_cases,"
                 "total_deaths,recovered,active_cases\n")
        for r in rows:
            fh.write(",".join(r) + "\n")
    print(f"{len(names)} countries, {len(rows)} rows -> {args.out}")


if __name__ == "__main__":
    main()
