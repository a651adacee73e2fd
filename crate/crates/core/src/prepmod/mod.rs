//! Nilpotent modules over preprojective algebras.

mod dump;
mod families;
mod hom;
mod injective;
mod module;
mod reflection;
mod stratum;

pub use dump::{AnyModule, ArrowDump, ModuleDump};
pub use families::{
    hat_graph, kminus, m_module, m_partial_products, m_reflection, n_hat, n_module, semisimple_primed, v_module,
    Route,
};
pub use hom::{
    hom_space, iso_false_negative_log2, is_iso, is_iso_with, random_combination, random_extension,
    random_injection, samples_for_bound, Extension, IsoOutcome, IsoSummary, RETRY_BUDGET,
};
pub use injective::{injective_hull, v_module_by_socle_chain, HULL_DIM_CAP};
pub use module::{exact_at_middle, ModuleMap, PModule, Submodule};
pub use reflection::{
    counit_from_sigma_star_sigma, sigma, sigma_map, sigma_signed, sigma_star, sigma_star_map, sigma_star_signed,
    sigma_star_word, sigma_word, unit_to_sigma_sigma_star, ReflectionSign,
};
pub use stratum::{
    build_filtered, eps_mod, eps_star_mod, extract_datum, extract_datum_traced, ExtractStep, StratumSampler,
};
