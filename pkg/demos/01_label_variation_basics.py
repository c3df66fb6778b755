"""Label variation ratios and areas, on a matrix small enough to read.

Eight samples, four stochastic passes each.  The LVR of a sample is the
share of passes that agree with its most frequent label, so it is always
one of 1/4, 2/4, 3/4, 4/4 here.  Partitioning into four areas then puts
every sample with count k into area k - 1, exactly.
"""

import numpy as np

from labelvar import LabelMatrix, compute_lvr, dominant_label, partition_areas

rows = np.array(
    [
        [2, 2, 2, 2],  # unanimous
        [2, 2, 2, 0],  # one dissenting pass
        [1, 1, 0, 0],  # an even split: dominant label is the smaller one
        [0, 1, 2, 0],
        [1, 1, 1, 1],
        [0, 0, 1, 2],
        [2, 0, 2, 2],
        [1, 2, 1, 2],
    ],
    dtype=np.int64,
)
matrix = LabelMatrix(labels=rows, num_classes=3)

lvr = compute_lvr(matrix)
partition = partition_areas(lvr, num_areas=4)

print("pass labels        dominant  count  LVR    area (of 4)")
for i in range(matrix.num_samples):
    label, count = dominant_label(rows[i], 3)
    print(
        f"{rows[i].tolist()!s:<18} {label:^8d} {count:^6d} "
        f"{lvr.values[i]:.2f}   {partition.assignment[i]}"
    )

print("\narea sizes:", partition.area_sizes.tolist())
print("samples with LVR exactly on an interval edge (like 2/4 with 2 areas)")
print("are assigned by integer arithmetic, so the half-open intervals are")
print("honored exactly: LVR 0.5 with 2 areas goes to the LOWER area:")
half = partition_areas(compute_lvr(LabelMatrix(rows[2:3], 3)), 2)
print("  [1, 1, 0, 0] ->", f"area {half.assignment[0]} of 2")
