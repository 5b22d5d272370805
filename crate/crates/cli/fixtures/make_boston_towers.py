"""Writes boston_towers.csv: a synthetic cell-tower table in OpenCellID layout.

Positions are scattered over central Boston with a denser downtown core; the
values are invented and only mimic the shape of a real export.
"""
import random

rng = random.Random(2017)
HEADER = "radio,mcc,net,area,cell,unit,lon,lat,range,samples,changeable,created,updated,averageSignal"
LAT = (42.330, 42.385)
LON = (-71.105, -71.035)
CORE = (42.356, -71.060)

rows = []
for i in range(220):
    radio = "LTE" if i < 170 else ("UMTS" if i < 200 else "GSM")
    if rng.random() < 0.35:
        lat = min(max(rng.gauss(CORE[0], 0.006), LAT[0]), LAT[1])
        lon = min(max(rng.gauss(CORE[1], 0.008), LON[0]), LON[1])
    else:
        lat = rng.uniform(*LAT)
        lon = rng.uniform(*LON)
    rng_m = "" if rng.random() < 0.08 else str(int(round(10 ** rng.uniform(2.2, 3.4))))
    net = rng.choice(["410", "260", "120"])
    area = str(rng.randint(1000, 1099))
    cell = str(100000 + i * 37)
    samples = rng.randint(1, 300)
    created = 1450000000 + rng.randint(0, 60000000)
    updated = created + rng.randint(0, 60000000)
    rows.append(f"{radio},310,{net},{area},{cell},0,{lon:.6f},{lat:.6f},{rng_m},{samples},1,{created},{updated},0")

with open("boston_towers.csv", "w", newline="\n") as f:
    f.write(HEADER + "\n")
    f.write("\n".join(rows) + "\n")
