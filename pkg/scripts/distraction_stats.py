"""Inspect the texting-distraction stream: ring gaps and episode shapes.

    python scripts/distraction_stats.py [SEED] [EPISODES]
"""

import sys
from collections import Counter
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from drivesim.monitor import PhoneSource


def main():
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 42
    episodes = int(sys.argv[2]) if len(sys.argv) > 2 else 1000

    src = PhoneSource(seed)
    events = []
    t = 0
    while len(src.ring_times) < episodes + 1:
        t += 5000
        events.extend(src.poll(t))

    rings = src.ring_times[: episodes + 1]
    gaps = [b - a for a, b in zip(rings, rings[1:])]
    touches_per_episode = Counter()
    episode = -1
    for e in events:
        if e.kind == "ring":
            episode += 1
        elif e.kind == "touchscreen":
            touches_per_episode[episode] += 1

    print(f"seed {seed}: {episodes} inter-ring gaps")
    print(f"  min {min(gaps):.2f} s   max {max(gaps):.2f} s   "
          f"mean {sum(gaps) / len(gaps):.2f} s")
    hist = Counter(int(g // 5) * 5 for g in gaps)
    for lo in sorted(hist):
        print(f"  [{lo:2d},{lo + 5:2d}) s  {'#' * (hist[lo] * 60 // episodes)} {hist[lo]}")
    counts = Counter(touches_per_episode.values())
    print("touchscreen events per episode:",
          {k: counts[k] for k in sorted(counts)})


if __name__ == "__main__":
    main()
