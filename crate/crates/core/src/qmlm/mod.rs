//! Quantum minimal learning machine: fidelity Gram matrices as distances,
//! a least-squares map between them, and nearest-output prediction.

mod encoding;
mod model;

pub use encoding::{decode_label, encode_label, label_fidelity};
pub use model::{
    load_model, predict_label_qmlm, predict_qmlm, prediction_quality, save_model,
    similarity_scores, train_qmlm, train_qmlm_labels, QmlmModel,
};
