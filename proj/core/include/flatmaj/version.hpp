#pragma once

namespace flatmaj {

// Report schema version embedded in every CLI report.
inline constexpr const char* kReportSchema = "1.0.0";

}  // namespace flatmaj
