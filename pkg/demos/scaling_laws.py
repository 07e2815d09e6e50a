# How body mass shapes the voice: walk the scaling laws from mouse to
# elephant and print every derived quantity.

import numpy as np

from mammalvoc import profile

print(f"{'mass kg':>10} {'lungs mL':>10} {'breath Hz':>10} {'flow L/s':>10} "
      f"{'F0 Hz':>9} {'tract cm':>9} {'utter s':>8}")

for mass in [0.02, 0.3, 2.0, 4.0, 15.0, 60.0, 600.0, 5000.0]:
    p = profile(mass)
    print(f"{p.mass_kg:>10g} {p.lung_capacity_ml:>10.1f} "
          f"{p.breathing_rate_hz:>10.3f} {p.flow_rate_l_s:>10.4f} "
          f"{p.fundamental_frequency_hz:>9.1f} {p.tract_length_cm:>9.2f} "
          f"{p.utterance_duration_s:>8.2f}")

# The interesting structural facts: pitch falls roughly 2.5 octaves for
# every factor-1000 of mass, while utterance length grows slowly.
masses = np.logspace(-2, 4, 13)
f0 = np.array([profile(m).fundamental_frequency_hz for m in masses])
octaves = np.log2(f0[0] / f0[-1])
print(f"\nF0 spans {octaves:.1f} octaves across {masses[0]:g}-{masses[-1]:g} kg")
