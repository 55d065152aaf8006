use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use pedscan_core::dataset::{
    extract_positives, parse_annotation, parse_manifest, sample_negatives, stats, AnnotationFormat, DatasetStats,
    GroundTruthBox, ImageAnnotation, ManifestEntry, Split, VocOptions,
};
use pedscan_core::{GrayImage, Rect};

use crate::args::PrepareArgs;
use crate::error::{CliError, CliResult};
use crate::imageio::{load_gray, save_pgm};
use crate::util::{read_text, write_text};

pub const INDEX_FILE: &str = "index.tsv";
pub const NEG_IMAGES_FILE: &str = "negimages.txt";
pub const STATS_HEADER: &str = "train_images,train_labels,test_images,test_labels,total_labels,person_free_images";

/// A manifest entry with its parsed annotation (empty for person-free images).
pub struct Annotated {
    pub entry: ManifestEntry,
    pub ann: ImageAnnotation,
}

pub fn load_manifest(path: &Path, voc: VocOptions) -> CliResult<Vec<Annotated>> {
    let text = read_text(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let entries = parse_manifest(&text, base)?;
    entries
        .into_iter()
        .map(|entry| {
            let ann = match &entry.annotation_path {
                None => ImageAnnotation::default(),
                Some(a) => {
                    let t = read_text(a)?;
                    parse_annotation(&t, AnnotationFormat::from_path(a), voc)
                        .map_err(|e| CliError::Input(format!("{}: {e}", a.display())))?
                }
            };
            Ok(Annotated { entry, ann })
        })
        .collect()
}

/// Images with at least one labelled person count towards the image
/// columns; everything else is person-free.
pub fn corpus_stats(items: &[Annotated]) -> (DatasetStats, usize) {
    let pick = |s: Split| -> Vec<ImageAnnotation> {
        items
            .iter()
            .filter(|a| a.entry.split == s && !a.ann.boxes.is_empty())
            .map(|a| a.ann.clone())
            .collect()
    };
    let free = items.iter().filter(|a| a.ann.boxes.is_empty()).count();
    (stats(&pick(Split::Train), &pick(Split::Test)), free)
}

pub fn stats_row(s: &DatasetStats, person_free: usize) -> String {
    format!(
        "{},{},{},{},{},{}",
        s.n_train_images, s.n_train_labels, s.n_test_images, s.n_test_labels, s.n_total, person_free
    )
}

fn clip(boxes: &[GroundTruthBox], w: usize, h: usize) -> Vec<GroundTruthBox> {
    boxes
        .iter()
        .filter_map(|b| {
            let r = b.rect;
            let (x1, y1) = (r.right().min(w), r.bottom().min(h));
            (r.x < x1 && r.y < y1).then(|| GroundTruthBox {
                rect: Rect::new(r.x, r.y, x1 - r.x, y1 - r.y),
                ..b.clone()
            })
        })
        .collect()
}

pub fn run(args: &PrepareArgs, out: &mut dyn Write) -> CliResult<()> {
    let voc = VocOptions {
        include_difficult: !args.exclude_difficult,
    };
    let items = load_manifest(&args.manifest, voc)?;
    let (st, free) = corpus_stats(&items);
    writeln!(out, "{STATS_HEADER}")?;
    writeln!(out, "{}", stats_row(&st, free))?;
    if args.stats_only {
        return Ok(());
    }

    let mut images: Vec<GrayImage> = Vec::new();
    let mut boxes: Vec<Vec<Rect>> = Vec::new();
    let mut positives = Vec::new();
    let mut neg_paths: Vec<PathBuf> = Vec::new();
    for it in items.iter().filter(|a| a.entry.split == Split::Train) {
        let img = load_gray(&it.entry.image_path)?;
        let b = clip(&it.ann.boxes, img.width(), img.height());
        positives.extend(extract_positives(&img, &b)?);
        if it.ann.boxes.is_empty() {
            neg_paths.push(it.entry.image_path.clone());
        }
        boxes.push(b.iter().map(|g| g.rect).collect());
        images.push(img);
    }
    let n_neg = positives.len() * args.neg_ratio;
    let negatives = if images.is_empty() {
        Vec::new()
    } else {
        sample_negatives(&images, &boxes, n_neg, args.seed)?
    };

    let dir = &args.out;
    for sub in ["pos", "neg"] {
        fs::create_dir_all(dir.join(sub)).map_err(|e| CliError::write(&dir.join(sub), e))?;
    }
    let mut index = String::new();
    for (label, set) in [("pos", &positives), ("neg", &negatives)] {
        for (i, p) in set.iter().enumerate() {
            let rel = format!("{label}/{i:06}.pgm");
            save_pgm(&dir.join(&rel), p)?;
            index.push_str(&format!("{label}\t{rel}\n"));
        }
    }
    write_text(&dir.join(INDEX_FILE), &index)?;
    let negs: String = neg_paths.iter().map(|p| format!("{}\n", p.display())).collect();
    write_text(&dir.join(NEG_IMAGES_FILE), &negs)?;
    eprintln!(
        "wrote {} positive and {} negative patches to {}",
        positives.len(),
        negatives.len(),
        dir.display()
    );
    Ok(())
}
