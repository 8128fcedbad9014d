#include "scengen/report.hpp"

#include "scengen/io.hpp"

#include <map>
#include <sstream>

namespace scengen {

std::string make_report_csv(const std::vector<RunArchive>& archives, Scalar dup_threshold) {
    if (archives.empty()) throw std::invalid_argument("make_report_csv: no archives");
    for (const RunArchive& a : archives)
        if (a.use_case != archives.front().use_case)
            throw FormatError("make_report_csv: archives mix use cases");

    struct Group {
        std::vector<Scalar> failures;
        std::vector<Scalar> sparseness_values;
    };
    std::map<std::string, Group> groups;  // ordered: deterministic output

    for (const RunArchive& a : archives) {
        const std::string label = a.space + "_" + a.algo;
        Group& g = groups[label];
        const FailureSet fails = distinct_failures(a, dup_threshold);
        g.failures.push_back(static_cast<Scalar>(fails.records.size()));
        if (fails.records.size() >= 2) g.sparseness_values.push_back(sparseness(fails));
    }

    std::ostringstream out;
    out << "group,archives,mean_failures,mean_sparseness\n";
    for (const auto& [label, g] : groups) {
        Scalar mean_fail = 0;
        for (Scalar f : g.failures) mean_fail += f;
        mean_fail /= static_cast<Scalar>(g.failures.size());
        out << label << ',' << g.failures.size() << ',' << format_double(mean_fail) << ',';
        if (!g.sparseness_values.empty()) {
            Scalar mean_sparse = 0;
            for (Scalar s : g.sparseness_values) mean_sparse += s;
            mean_sparse /= static_cast<Scalar>(g.sparseness_values.size());
            out << format_double(mean_sparse);
        }
        out << '\n';
    }

    if (groups.size() < 2) return out.str();

    out << "\nmetric,A,B,p_value,effect_size,magnitude\n";
    for (auto ia = groups.begin(); ia != groups.end(); ++ia) {
        for (auto ib = std::next(ia); ib != groups.end(); ++ib) {
            if (ia->second.failures.size() >= 3 && ib->second.failures.size() >= 3) {
                const StatReport r = compare_samples(ia->second.failures, ib->second.failures);
                out << "failures," << ia->first << ',' << ib->first << ','
                    << format_double(r.p_value) << ',' << format_double(r.cliffs_delta) << ','
                    << magnitude_letter(r.magnitude) << '\n';
            }
            if (ia->second.sparseness_values.size() >= 3 &&
                ib->second.sparseness_values.size() >= 3) {
                const StatReport r =
                    compare_samples(ia->second.sparseness_values, ib->second.sparseness_values);
                out << "sparseness," << ia->first << ',' << ib->first << ','
                    << format_double(r.p_value) << ',' << format_double(r.cliffs_delta) << ','
                    << magnitude_letter(r.magnitude) << '\n';
            }
        }
    }
    return out.str();
}

}  // namespace scengen
