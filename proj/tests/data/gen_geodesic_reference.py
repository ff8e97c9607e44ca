"""Regenerates geodesic_reference.csv with GeographicLib (pip install geographiclib)."""
import math
import random

from geographiclib.geodesic import Geodesic


def random_point(rng):
    return math.degrees(math.asin(rng.uniform(-1, 1))), rng.uniform(-180, 180)


def main():
    rng = random.Random(20200316)
    geod = Geodesic.WGS84
    rows = []
    for _ in range(9900):
        rows.append(random_point(rng) + random_point(rng))
    for i in range(100):
        lat1, lon1 = random_point(rng)
        if i < 20:
            lat1 = rng.uniform(-0.5, 0.5)  # equatorial, the hardest case
        lat2 = -lat1 + rng.uniform(-0.5, 0.5)
        lon2 = lon1 + 180 + rng.uniform(-0.5, 0.5)
        lon2 = (lon2 + 180) % 360 - 180
        rows.append((lat1, lon1, max(-90.0, min(90.0, lat2)), lon2))
    with open("geodesic_reference.csv", "w") as out:
        out.write("# smi:geodesic_reference:v1\n")
        out.write("lat1,lon1,lat2,lon2,distance_m,near_antipodal\n")
        for i, (lat1, lon1, lat2, lon2) in enumerate(rows):
            s12 = geod.Inverse(lat1, lon1, lat2, lon2, Geodesic.DISTANCE)["s12"]
            out.write(f"{lat1!r},{lon1!r},{lat2!r},{lon2!r},{s12!r},{int(i >= 9900)}\n")


if __name__ == "__main__":
    main()
