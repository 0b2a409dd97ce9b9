#pragma once

namespace rdv {

/// One noisy telemetry reading taken at `time`.
struct TelemetrySample {
  double time = 0.0;
  double driver_velocity = 0.0;      ///< measured d theta / dt
  double historical_velocity = 0.0;  ///< profile value at `time`
  double position = 0.0;             ///< measured theta
};

/// Ground truth of the driver. The controller only uses it to score a capture.
struct DriverTruth {
  double time = 0.0;
  double theta = 0.0;
  double velocity = 0.0;  ///< a(t) * profile(t), held over the current step
};

}  // namespace rdv
