//! Raster IO, contrast normalization, and stack co-registration.

mod codec;
mod normalize;
mod pyramid;
mod raster;
mod register;
mod resample;
mod transform;

pub use codec::{decode_png, decode_ppm, encode_ppm, load_image, save_image, CodecError};
pub use normalize::normalize_contrast;
pub use pyramid::{build_pyramid, Pyramid};
pub use raster::{Plane, RasterError, RasterImage};
pub use register::{
    format_transforms, read_transforms, register_pair, register_stack, register_stack_to, write_transforms, Alignment,
    RegisterError, RegisteredFrame, RegistrationOptions, TransformRecord,
};
pub use resample::{resample, resample_plane};
pub use transform::{RegistrationTransform, TransformMode};
