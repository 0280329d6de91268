#pragma once

#include <string>
#include <variant>

#include "bcert/certifier.hpp"

namespace bcert {

using Certificate = std::variant<ReachCertificate, BarrierCertificate>;

// Plain-text (JSON) certificate record: mode, horizon, property, polynomials
// in round-trip syntax, thresholds, cone witnesses, and validation evidence —
// everything an independent checker needs.
std::string certificate_to_text(const Certificate& cert);
Certificate certificate_from_text(const std::string& text);

void save_certificate(const std::string& path, const Certificate& cert);
Certificate load_certificate(const std::string& path);

}  // namespace bcert
