pub mod soundness;
