"""Frozen numbers for the example checks.

Each value was produced by an independent evaluation (scipy quad along the
free-fall trajectory, or direct evaluation of the closed form in plain
floats) before the package code existed; scripts/oracle_check.py recomputes
them. Target figures from the acceptance criteria are kept separately as TARGET_*.
"""

DTAU_G981_T3 = 9.636454322895274e-15               # s
YB_CLOCK_PHASE_T3 = 31.605861928189693             # rad, Omega * dtau
K_YB = 10940035.791686937                          # 1/m, Omega / c
YB_BUTTERFLY_RECOILLESS_T3 = 5.926099111535568     # rad, (3/16) Omega dtau
YB_KINETIC_ROW_T3 = 2.963049555767784              # rad
YB_WAVEPACKET_T3_VAR1E6 = 5.4736670071815897e-08   # rad
VR_YB174 = 0.003994378188602583                    # m/s
DT2_RECOILLESS = -9.203010340226819e-09            # s, light delay at T/4, T = 3, r0 = v0 = 0
DT2_BRANCH1_RECOIL = -9.193017733017171e-09        # s, same for the kicked branch
SIGMA_YB = 1.0672375202138566e-07
SIGMA_SR = 1.2955767105851933e-07
CAMPAIGN_DAYS = 138.88888888888889
FOUNTAIN_DALPHA_1E7 = 1.6060757204825455e-22
G_DR0_1MM = 1.0914547879595962e-19
BUTTERFLY_DALPHA_1E7 = 3.011391975904773e-23
DV0_GG_LIMIT = 1.0354870989261658e-08              # m/s, eps = 1e-7, Gamma_zz = 3.1e-6
DA_LIMIT = 9.81e-07                                # m/s^2, eps = 1e-7
YB_COLOCATION = (2.044478993933616e-3, 1.3629859959557442e-3)   # m, m/s
SR_COLOCATION = (1.2400561597799432e-3, 8.267041065199622e-4)

TARGET_SIGMA_YB = 1e-7
TARGET_SIGMA_SR = 1.2e-7
TARGET_CAMPAIGN_DAYS = 138
TARGET_DA = 1e-6
TARGET_DV0 = 1e-8
TARGET_COLOCATION = {"Yb": (4.2e-3, 1.4e-3), "Sr": (2.5e-3, 0.8e-3)}
