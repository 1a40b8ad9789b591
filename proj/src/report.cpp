#include "hlyl/data_io.hpp"
#include "hlyl/error.hpp"

#include <cmath>
#include <json.hpp>

namespace hlyl {

using ordered_json = nlohmann::ordered_json;

std::string write_fit_report(const ExpenditureFit &fit) {
    ordered_json doc;
    doc["currency_unit"] = fit.currency_unit;
    doc["n"] = fit.data.size();
    doc["mx_star"] = fit.mx_star;
    doc["move_up"] = fit.move_up;
    doc["move_up_source"] = fit.move_up_auto ? "auto" : "fixed";
    doc["first_group_multiplier"] = fit.first_group_multiplier;
    doc["k"] = fit.k;
    doc["k_source"] = fit.k_source == KSource::fitted ? "fitted" : "fixed";

    auto groups = ordered_json::array();
    for (std::size_t i = 0; i < fit.data.size(); ++i) {
        ordered_json g;
        g["label"] = fit.labels[i];
        g["x_ref"] = fit.x_ref[i];
        g["m_star"] = fit.features.m_star[i];
        g["cum"] = fit.features.cum[i];
        g["f"] = fit.features.f[i];
        g["estimate"] = fit.estimates[i];
        g["estimate_rounded"] = std::llround(fit.estimates[i]);
        g["data"] = fit.data[i];
        g["residual"] = fit.stats.residuals[i];
        groups.push_back(std::move(g));
    }
    doc["groups"] = std::move(groups);

    doc["sse"] = fit.stats.sse;
    doc["se"] = fit.stats.se;
    doc["se_divisor"] = fit.se_divisor == SeDivisor::n ? "n" : "n-p";
    if (fit.stats.r2_standard) {
        doc["r2_standard"] = *fit.stats.r2_standard;
    } else {
        doc["r2_standard"] = nullptr;
    }
    doc["sum_estimates"] = fit.stats.sum_estimates;
    doc["sum_data"] = fit.stats.sum_data;
    doc["moveup_fraction"] = fit.stats.moveup_fraction;

    // Key name is part of the report schema.
    doc["paper_reference"] = {
        {"k_table", published::k_table}, {"k_text", published::k_text}, {"r2", published::r2},
        {"sse", published::sse},         {"se", published::se},         {"mx_star", published::mx_star},
    };
    return doc.dump(2) + "\n";
}

ExpenditureFit read_fit_report(std::string_view json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
        ExpenditureFit fit;
        fit.currency_unit = doc.at("currency_unit").get<std::string>();
        fit.mx_star = doc.at("mx_star").get<double>();
        fit.move_up = doc.at("move_up").get<double>();
        fit.move_up_auto = doc.at("move_up_source").get<std::string>() == "auto";
        fit.first_group_multiplier = doc.at("first_group_multiplier").get<double>();
        fit.k = doc.at("k").get<double>();
        fit.k_source = doc.at("k_source").get<std::string>() == "fitted" ? KSource::fitted : KSource::fixed;
        fit.se_divisor = doc.at("se_divisor").get<std::string>() == "n" ? SeDivisor::n : SeDivisor::n_minus_p;
        for (const auto &g : doc.at("groups")) {
            fit.labels.push_back(g.at("label").get<std::string>());
            fit.x_ref.push_back(g.at("x_ref").get<double>());
            fit.features.m_star.push_back(g.at("m_star").get<double>());
            fit.features.cum.push_back(g.at("cum").get<double>());
            fit.features.f.push_back(g.at("f").get<double>());
            fit.estimates.push_back(g.at("estimate").get<double>());
            fit.data.push_back(g.at("data").get<double>());
            fit.stats.residuals.push_back(g.at("residual").get<double>());
        }
        fit.stats.sse = doc.at("sse").get<double>();
        fit.stats.se = doc.at("se").get<double>();
        if (!doc.at("r2_standard").is_null()) {
            fit.stats.r2_standard = doc.at("r2_standard").get<double>();
        }
        fit.stats.sum_estimates = doc.at("sum_estimates").get<double>();
        fit.stats.sum_data = doc.at("sum_data").get<double>();
        fit.stats.moveup_fraction = doc.at("moveup_fraction").get<double>();
        return fit;
    } catch (const nlohmann::json::exception &e) {
        fail(ErrorCode::parse_error, std::string("malformed fit report: ") + e.what());
    }
}

} // namespace hlyl
