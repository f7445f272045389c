#pragma once

namespace awva::units {

// Internal units are rad/fs for (angular) frequencies and fs for delays.
// Laboratory inputs use THz and attoseconds: 1 THz = 1e-3 rad/fs and
// 1 as = 1e-3 fs.  Conversions divide/multiply by 1000.0 so that the
// documented lab values (2400 THz, 55 THz, 8 as) round-trip exactly.

inline double thz_to_radfs(double thz) { return thz / 1000.0; }
inline double radfs_to_thz(double radfs) { return radfs * 1000.0; }
inline double as_to_fs(double as) { return as / 1000.0; }
inline double fs_to_as(double fs) { return fs * 1000.0; }

}  // namespace awva::units
