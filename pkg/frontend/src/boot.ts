import { initApp } from './main';

const root = document.getElementById('app');
if (!root) {
  throw new Error('missing #app mount point');
}
// same-origin service by default; override for a split dev setup
const baseUrl = (window as { MATS_API_BASE?: string }).MATS_API_BASE ?? '';
initApp(root, { baseUrl });
