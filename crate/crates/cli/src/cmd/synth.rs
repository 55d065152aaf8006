use std::fs;
use std::io::Write;
use std::path::Path;

use pedscan_core::synth::{clutter, scene};
use pedscan_core::Rect;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::args::SynthArgs;
use crate::error::{CliError, CliResult};
use crate::imageio::save_png;
use crate::util::write_text;

pub const MANIFEST_FILE: &str = "manifest.tsv";

/// INRIA-style annotation text for `boxes` in an image called `file`.
pub fn inria_annotation(file: &str, w: usize, h: usize, boxes: &[Rect]) -> String {
    let mut s = format!("Image filename : \"{file}\"\nImage size [Xmax x Ymax x C] : {w} x {h} x 1\n");
    for (i, b) in boxes.iter().enumerate() {
        s.push_str(&format!(
            "Bounding box for object {} \"PASperson\" (Xmin, Ymin) - (Xmax, Ymax) : ({}, {}) - ({}, {})\n",
            i + 1,
            b.x,
            b.y,
            b.right() - 1,
            b.bottom() - 1
        ));
    }
    s
}

pub fn write_corpus(args: &SynthArgs) -> CliResult<()> {
    let dir = &args.out;
    for sub in ["images", "annotations"] {
        fs::create_dir_all(dir.join(sub)).map_err(|e| CliError::write(&dir.join(sub), e))?;
    }
    let (w, h) = args.size;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut manifest = String::new();
    let mut emit = |split: &str, name: String, with_people: bool, manifest: &mut String| -> CliResult<()> {
        let file = format!("{name}.png");
        let (img, boxes) = if with_people {
            scene(w, h, args.figures, 2.5, &mut rng)
        } else {
            (clutter(w, h, &mut rng), Vec::new())
        };
        save_png(&dir.join("images").join(&file), &img)?;
        let ann = if with_people {
            let rel = format!("annotations/{name}.txt");
            write_text(&dir.join(&rel), &inria_annotation(&file, w, h, &boxes))?;
            rel
        } else {
            "-".into()
        };
        manifest.push_str(&format!("{split}\timages/{file}\t{ann}\n"));
        Ok(())
    };
    for i in 0..args.train {
        emit("train", format!("train_{i:04}"), true, &mut manifest)?;
    }
    for i in 0..args.person_free {
        emit("train", format!("free_{i:04}"), false, &mut manifest)?;
    }
    for i in 0..args.test {
        emit("test", format!("test_{i:04}"), true, &mut manifest)?;
    }
    write_text(&dir.join(MANIFEST_FILE), &manifest)
}

pub fn run(args: &SynthArgs, out: &mut dyn Write) -> CliResult<()> {
    write_corpus(args)?;
    writeln!(out, "{}", Path::new(&args.out).join(MANIFEST_FILE).display())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use pedscan_core::dataset::parse_inria;

    #[test]
    fn annotation_parses_back() {
        let boxes = vec![Rect::new(3, 4, 32, 64), Rect::new(100, 10, 40, 80)];
        let ann = parse_inria(&inria_annotation("x.png", 320, 240, &boxes)).unwrap();
        assert_eq!(ann.image_id, "x");
        assert_eq!(ann.size, Some((320, 240)));
        assert_eq!(ann.boxes.iter().map(|b| b.rect).collect::<Vec<_>>(), boxes);
    }
}
