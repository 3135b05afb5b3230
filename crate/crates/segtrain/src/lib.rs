//! Desk-scale self-training for semantic segmentation.
//!
//! `segtrain` implements a complete teacher/pseudo-label/student training
//! pipeline on top of a deterministic synthetic scene generator, so the whole
//! system is testable on a laptop in minutes:
//!
//! * [`maskops`] — connected components, instance centroids and the per-class
//!   centroid index built before training.
//! * [`sampler`] — class-uniform centroid sampling, pseudo:real mix ratios,
//!   crop extraction and data augmentation.
//! * [`schedules`] — crop-size schedules (constant, coarse2fine, fine2coarse
//!   and their per-epoch cycling variants), crop-size warm-up, polynomial
//!   learning-rate decay, batch-for-crop scaling and the processed-pixel
//!   compute proxy.
//! * [`pseudolabel`] — teacher inference over unlabeled images producing hard
//!   or soft pseudo labels, with optional confidence filtering.
//! * [`metrics`] — confusion-matrix accumulation and per-class IoU / mIoU.
//! * [`model`] — a small fully-convolutional encoder-decoder with three
//!   presets and hand-rolled, finite-difference-checked gradients.
//! * [`trainer`] — SGD training loops: teacher training, joint student
//!   training on mixed labels, pretrain-then-finetune, multi-loop
//!   self-training, OHEM loss and cross-domain finetuning.
//! * [`synthgen`] — deterministic synthetic driving-scene stand-in with
//!   extreme class imbalance, domain shift and new-category targets.
//! * [`experiment`] — experiment configs, the end-to-end pipeline commands and
//!   structured metric documents.
//! * [`report`] — plots and summary tables rendered from metric documents.
//!
//! The `segtrain` binary exposes each pipeline stage as a subcommand; the
//! crate's `examples/` directory contains one runnable example per major
//! capability.

pub mod error;
pub mod experiment;
pub mod mask;
pub mod maskops;
pub mod metrics;
pub mod model;
pub mod plot;
pub mod pseudolabel;
pub mod report;
pub mod sampler;
pub mod schedules;
pub mod synthgen;
pub mod trainer;
pub mod util;

pub use error::{Error, Result};
pub use mask::{LabelMask, IGNORE};
