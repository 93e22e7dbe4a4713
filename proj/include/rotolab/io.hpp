#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

#include "rotolab/chains.hpp"
#include "rotolab/intersections.hpp"
#include "rotolab/periodic_points.hpp"
#include "rotolab/rotation_set.hpp"
#include "rotolab/tangency_finder.hpp"

namespace rotolab {

using Json = nlohmann::ordered_json;

/// Deterministic text: 2-space indent, doubles with 17 significant digits, non-finite as null.
std::string dump(const Json& j);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view text);
Json read_json(const std::string& path);
void write_json(const std::string& path, const Json& j);

std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

Json to_json(PlanePoint p);
Json to_json(IntVec v);
Json to_json(const std::vector<PlanePoint>& pts);
Json to_json(const FamilyParams& p);
Json to_json(const RotationSetApprox& rs);
Json to_json(const SaddleRecord& r);
Json to_json(const ManifoldArc& a);
Json to_json(const IntersectionEvent& e);
Json to_json(const TranslateSpectrum& s);
Json to_json(const Lemma0Report& r);
Json to_json(const SupportData& s);
Json to_json(const MembershipCertificate& c);
Json to_json(const CriticalResult& c);
Json to_json(const ContinuationCurve& c);
Json to_json(const LefschetzReport& r);
Json to_json(const ChainCurve& c);
Json to_json(const ThetaBand& t);
Json to_json(const Separation& s);
Json to_json(const TangencyRecord& r);
Json to_json(const UnfoldingFit& f);
Json to_json(const BoundCheck& b);
Json to_json(const PersistenceReport& p);

PlanePoint point_from_json(const Json& j);
IntVec intvec_from_json(const Json& j);
std::vector<PlanePoint> points_from_json(const Json& j);
FamilyParams params_from_json(const Json& j);
RotationSetApprox hull_from_json(const Json& j);
SaddleRecord saddle_from_json(const Json& j);
ManifoldArc arc_from_json(const Json& j);
IntersectionEvent event_from_json(const Json& j);
ChainCurve chain_from_json(const Json& j);
SupportData support_from_json(const Json& j);

/// "0,-1" -> (0,-1); "0.5,0.25" -> point. Config error on malformed input.
IntVec parse_intvec(const std::string& s);
PlanePoint parse_point(const std::string& s);

} // namespace rotolab
