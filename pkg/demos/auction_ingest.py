"""From a raw auction export to fitted market prices.

The same pipeline is available from the command line:

    kmarkets price --input bids.csv --k 3
"""

import tempfile
from pathlib import Path

from kmarkets import ingest, k_markets_erm, uniform_erm

ROWS = """auction_id,bid,bidder_id,bidder_rating
a01,12.50,walt,120
a01,14.00,jesse,15
a02,9.75,walt,120
a02,31.00,gus,870
a03,14.00,mike,430
a03,22.25,gus,870
a04,8.00,saul,95
a04,19.50,mike,430
a05,11.25,jesse,15
"""

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "bids.csv"
    path.write_text(ROWS)
    data, report = ingest(path)

print(f"rows read: {report.rows_read}, distinct bidders kept: {report.bidders_kept}")
print(f"bid range {report.y_min} .. {report.y_max}, rating range {report.x_min} .. {report.x_max}")
print()

# each bidder is reduced to their highest bid; both coordinates are then
# min-max normalized into the unit square
for y, x in zip(data.y, data.x):
    print(f"  value {y:.3f}  covariate {x:.3f}")
print()

print(f"single fitted price: {uniform_erm(data.y):.3f}")
pf, part = k_markets_erm(data, 3)
print(f"{part.k_effective} rating segments (requested {part.k_requested}):")
for i, (price, members) in enumerate(zip(pf.prices, part.markets)):
    print(f"  segment {i + 1}: price {price:.3f}, {len(members)} bidders")
