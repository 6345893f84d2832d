//! Finitely presented groups: words, presentations and area certificates.

pub mod area;
pub mod presentation;
pub mod word;

pub use area::{
    conjugator_cap, dehn_bounded, dehn_lower_bound, search_area_certificate, search_area_certificate_with,
    verify_area_certificate, AreaCertificate, CertificateCheck, DehnEntry, DehnRow, Peeler, RelatorIndex,
    SearchLimits, SearchOutcome, Step,
};
pub use presentation::Presentation;
pub use word::{commutator, reduce_word, reduced_words_of_length, Letter, Word};
