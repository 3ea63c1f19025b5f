"""Looking up dimension bounds by fixed configuration and group type."""

from planelab import classification_facts as facts

row = facts.lookup("flag", "arbitrary")
print("flag fixed, arbitrary group:", {k: row.bound(k) for k in facts.BOUND_NAMES})
for k in ("b", "c"):
    print(f"  {facts.BOUND_MEANING[k]}: {row.bound(k)}")

print()
print(facts.format_rows(facts.query(group_class="semisimple")))

notes = facts.footnotes()
first = facts.lookup("empty", "semisimple")
for n in first.footnotes:
    print(f"\nfootnote {n}: {notes[n][0]}")

for s in facts.unital_summary(plane_dimension=16):
    print(f"\n16-dimensional {s.planes}: {s.classes} classes; unitals {s.unitals}")
